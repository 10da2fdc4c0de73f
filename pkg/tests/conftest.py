'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=redefined-outer-name
import pytest

from liv_vein.evalkit.synth import PhantomSpec, gen_phantom


SMALL_SPEC = PhantomSpec(seed=3, width=96, height=64, vein_count=2)


@pytest.fixture(scope='session')
def phantom():
    '''Default 320x240 phantom: (image, truth).'''
    return gen_phantom(PhantomSpec())


@pytest.fixture(scope='session')
def small_phantom():
    '''96x64 phantom with two veins: (image, truth).'''
    return gen_phantom(SMALL_SPEC)


@pytest.fixture
def write_pgm(tmp_path):
    '''Writes raw P5 bytes, returning the path.'''
    def _write(name, width, height, samples, maxval=255, header=None):
        path = tmp_path / name
        head = header if header is not None else \
            b'P5\n%d %d\n%d\n' % (width, height, maxval)
        path.write_bytes(head + bytes(samples))
        return str(path)

    return _write
