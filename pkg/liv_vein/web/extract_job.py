'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=broad-except
import base64
import binascii
import logging
import os.path
import shutil
import tempfile

from liv_vein import clustering, extraction, gpo, imagecore
from liv_vein.config import load_config
from liv_vein.web.job import Job, save_export


_LOGGER = logging.getLogger(__name__)

_STAGES = ['extract', 'export']


class ExtractJob(Job):
    '''Extracts the vein mask of an uploaded image.'''

    def __init__(self, query, out_dir):
        Job.__init__(self, _STAGES)

        for key in ['file_name', 'file_content']:
            if key not in query:
                raise ValueError('Missing field: ' + key)

        try:
            self.__content = base64.b64decode(query['file_content'],
                                              validate=True)
        except binascii.Error as err:
            raise ValueError('file_content is not base64: %s' % err) from err

        self.__name = os.path.splitext(
            os.path.basename(query['file_name']))[0] or 'image'
        self.__out_dir = out_dir

        overrides = query.get('config') or {}

        if not isinstance(overrides, dict):
            raise ValueError('config must be an object of overrides')

        # Uploaded overrides only; no server-side config file:
        self.__config = load_config(overrides=overrides, environ={})

    def run(self):
        '''Run.'''
        work_dir = tempfile.mkdtemp()
        done = 0

        try:
            self._fire_job_event('running', done, 'Extracting...')
            in_filename = os.path.join(work_dir, 'upload')

            with open(in_filename, 'wb') as fle:
                fle.write(self.__content)

            stages = extraction.extract_stages(
                imagecore.load_image(in_filename), self.__config)
            done += 1

            if self._cancelled:
                self._fire_job_event('cancelled', done, 'Job cancelled')
                return

            self._fire_job_event('running', done, 'Exporting...')
            out_dir = os.path.join(work_dir, 'out')
            os.makedirs(out_dir)
            self.__write(stages, out_dir)
            save_export(out_dir, self.__out_dir, self._job_id)
            done += 1

            self._result = self._job_id
            self._fire_job_event('finished', done, 'Job completed')
        except Exception as err:
            _LOGGER.exception('Job %s failed', self._job_id)
            self._fire_job_event('error', done, str(err))
        finally:
            shutil.rmtree(work_dir, ignore_errors=True)

    def __write(self, stages, out_dir):
        '''Writes mask, cluster table and orientation table.'''
        stem = os.path.join(out_dir, self.__name)

        imagecore.save_mask(stages.mask, stem + '_mask.pgm')
        clustering.cluster_table(stages.model).to_csv(stem + '_clusters.csv',
                                                      index=False)
        gpo.field_table(stages.field).to_csv(stem + '_field.csv',
                                             index=False)
