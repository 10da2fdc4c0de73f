'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
import os
import uuid
import zipfile


class Job():
    '''A unit of work that reports per-stage progress to listeners.'''

    def __init__(self, stages):
        self._job_id = str(uuid.uuid4())
        self._result = None
        self._cancelled = False

        self.__stages = list(stages)
        self.__listeners = set()

    def get_job_id(self):
        '''Gets job id.'''
        return self._job_id

    def cancel(self):
        '''Requests cancellation; checked between stages.'''
        self._cancelled = True

    def add_listener(self, listener):
        '''Adds an event listener.'''
        self.__listeners.add(listener)

    def run(self):
        '''Run.'''
        raise NotImplementedError()

    def _fire_job_event(self, status, done, message=''):
        '''Fires a progress event after `done` stages.'''
        total = len(self.__stages)
        event = {'job_id': self._job_id,
                 'update': {'status': status,
                            'message': message,
                            'progress': 100.0 * done / total,
                            'stage': self.__stages[min(done, total - 1)],
                            'done': done,
                            'stages': total}}

        if status == 'finished':
            event['result'] = self._result

        for listener in list(self.__listeners):
            listener.event_fired(event)


def save_export(parent_dir, out_dir, job_id):
    '''Zips a job's output directory as <out_dir>/<job_id>.zip.'''
    out_filename = os.path.join(out_dir, job_id + '.zip')

    with zipfile.ZipFile(out_filename, 'w') as zf:
        for filename in sorted(os.listdir(parent_dir)):
            zf.write(os.path.join(parent_dir, filename), filename)

    return out_filename
