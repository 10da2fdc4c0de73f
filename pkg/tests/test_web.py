'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=missing-function-docstring
# pylint: disable=redefined-outer-name
import base64
import importlib
import json
import os.path
import time
import zipfile

import pytest

from liv_vein import imagecore
from liv_vein.web.extract_job import ExtractJob
from liv_vein.web.manager import Manager


class _Recorder():
    '''Collects job events.'''

    def __init__(self):
        self.events = []

    def event_fired(self, event):
        '''Records an event.'''
        self.events.append(event)


@pytest.fixture
def upload(small_phantom, tmp_path):
    '''Base64 of a phantom PGM.'''
    path = str(tmp_path / 'upload.pgm')
    imagecore.save_image(small_phantom[0], path)

    with open(path, 'rb') as fle:
        return base64.b64encode(fle.read()).decode('ascii')


def _query(content, **extra):
    query = {'app': 'Extract', 'file_name': 'finger.pgm',
             'file_content': content}
    query.update(extra)
    return json.dumps(query)


def test_job_events(upload, tmp_path):
    job = ExtractJob(json.loads(_query(upload)), str(tmp_path))
    recorder = _Recorder()
    job.add_listener(recorder)
    job.run()

    statuses = [event['update']['status'] for event in recorder.events]
    assert statuses[-1] == 'finished'
    assert recorder.events[-1]['update']['progress'] == 100.0
    assert recorder.events[-1]['result'] == job.get_job_id()

    with zipfile.ZipFile(str(tmp_path / (job.get_job_id() + '.zip'))) as zf:
        assert zf.namelist() == ['finger_clusters.csv', 'finger_field.csv',
                                 'finger_mask.pgm']


def test_job_cancelled_between_stages(upload, tmp_path):
    job = ExtractJob(json.loads(_query(upload)), str(tmp_path))
    recorder = _Recorder()
    job.add_listener(recorder)
    job.cancel()
    job.run()

    assert recorder.events[-1]['update']['status'] == 'cancelled'
    assert not (tmp_path / (job.get_job_id() + '.zip')).exists()


def test_job_bad_image(tmp_path):
    content = base64.b64encode(b'not an image').decode('ascii')
    job = ExtractJob(json.loads(_query(content)), str(tmp_path))
    recorder = _Recorder()
    job.add_listener(recorder)
    job.run()

    assert recorder.events[-1]['update']['status'] == 'error'


@pytest.mark.parametrize('query', [
    {'file_name': 'a.pgm'},
    {'file_name': 'a.pgm', 'file_content': '***'},
    {'file_name': 'a.pgm', 'file_content': '', 'config': {'sigma': -1}},
    {'file_name': 'a.pgm', 'file_content': '', 'config': ['sigma', 2]},
    {'file_name': 'a.pgm', 'file_content': '', 'config': 'sigma=2'},
])
def test_job_rejects_query(query, tmp_path):
    with pytest.raises(ValueError):
        ExtractJob(query, str(tmp_path))


def test_manager_runs_job(upload, tmp_path):
    manager = Manager(str(tmp_path / 'export'), workers=1, poll=0.01)
    job_id = manager.submit(_query(upload, config={'min_area': 10}))
    manager.shutdown()

    assert manager.get_status(job_id)['update']['status'] == 'finished'
    assert manager.get_export(job_id).endswith(job_id + '.zip')

    events = list(manager.get_progress(job_id))
    assert len(events) == 1
    assert json.loads(events[0][len('data:'):])['update']['status'] == \
        'finished'


def test_manager_evicts_ended_jobs(upload, tmp_path):
    now = [0.0]
    manager = Manager(str(tmp_path / 'export'), workers=1, ttl=60.0,
                      clock=lambda: now[0])
    job_id = manager.submit(_query(upload))
    manager.shutdown()
    path = manager.get_export(job_id)
    assert os.path.exists(path)

    now[0] = 30.0
    assert manager.evict() == []
    assert manager.get_status(job_id)['update']['status'] == 'finished'

    now[0] = 61.0
    assert manager.evict() == [job_id]
    assert manager.get_status(job_id) is None
    assert manager.get_export(job_id) is None
    assert not os.path.exists(path)

    with pytest.raises(KeyError):
        manager.get_progress(job_id)


def test_manager_unknown_job(tmp_path):
    manager = Manager(str(tmp_path))

    assert manager.get_status('nope') is None

    with pytest.raises(KeyError):
        manager.get_progress('nope')

    manager.shutdown()


def test_manager_unknown_app(upload, tmp_path):
    manager = Manager(str(tmp_path))

    with pytest.raises(ValueError):
        manager.submit(_query(upload, app='Sequencing'))

    manager.shutdown()


@pytest.fixture
def client(tmp_path, monkeypatch):
    '''Flask test client exporting into tmp_path.'''
    monkeypatch.setenv('VEIN_EXPORT_DIR', str(tmp_path / 'export'))
    main = importlib.reload(importlib.import_module('main'))
    main.app.config['TESTING'] = True
    return main.app.test_client()


def test_app_round_trip(client, upload):
    response = client.post('/submit', data=_query(upload))
    assert response.status_code == 200
    job_id = json.loads(response.data)['job_id']

    deadline = time.time() + 120
    state = None

    while time.time() < deadline:
        state = client.get('/status/' + job_id).get_json()['update']['status']

        if state in ('finished', 'error', 'cancelled'):
            break

        time.sleep(0.05)

    assert state == 'finished'

    response = client.get('/result/' + job_id)
    assert response.status_code == 200
    assert response.data[:2] == b'PK'


def test_app_errors(client):
    assert client.get('/status/nope').status_code == 404
    assert client.get('/result/nope').status_code == 404
    assert client.get('/cancel/nope').status_code == 404
    assert client.post('/submit', data='{not json').status_code == 400
    assert client.post('/submit',
                       data=json.dumps({'file_name': 'a.pgm'})).status_code \
        == 400
    assert client.get('/no-such-route').status_code == 404
    bad_config = {'file_name': 'a.pgm', 'file_content': '', 'config': [1]}
    assert client.post('/submit',
                       data=json.dumps(bad_config)).status_code == 400
