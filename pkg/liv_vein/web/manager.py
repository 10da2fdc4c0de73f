'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=too-many-arguments
# pylint: disable=too-many-instance-attributes
from concurrent.futures import ThreadPoolExecutor
import json
import logging
import os.path
import threading
import time

from liv_vein.web.extract_job import ExtractJob


_LOGGER = logging.getLogger(__name__)

_FINAL = ('finished', 'cancelled', 'error')


class Manager():
    '''Queues extraction jobs on a worker pool and tracks their events.

    Jobs in a final state are forgotten, with their zips, ttl seconds after
    they end.'''

    def __init__(self, out_dir, workers=2, poll=1.0, ttl=3600.0,
                 clock=time.monotonic):
        self.__out_dir = out_dir
        self.__poll = poll
        self.__ttl = ttl
        self.__clock = clock
        self.__status = {}
        self.__jobs = {}
        self.__ended = {}
        self.__lock = threading.Lock()
        self.__executor = ThreadPoolExecutor(max_workers=workers)

        if not os.path.exists(self.__out_dir):
            os.makedirs(self.__out_dir)

    def submit(self, data):
        '''Queues a job from a JSON query, returning its id.'''
        self.evict()
        query = json.loads(data)
        job = self.__get_job(query)
        job_id = job.get_job_id()
        job.add_listener(self)

        with self.__lock:
            self.__jobs[job_id] = job
            self.__status[job_id] = {'job_id': job_id,
                                     'update': {'status': 'queued',
                                                'progress': 0.0}}

        self.__executor.submit(job.run)
        return job_id

    def get_progress(self, job_id):
        '''Yields server-sent events until the job reaches a final state.'''
        if job_id not in self.__jobs:
            raise KeyError(job_id)

        def _check_progress():
            while self.__get_state(job_id) not in _FINAL:
                yield 'data:' + self.__get_response(job_id) + '\n\n'
                time.sleep(self.__poll)

            yield 'data:' + self.__get_response(job_id) + '\n\n'

        return _check_progress()

    def get_status(self, job_id):
        '''Latest event of a job, or None.'''
        with self.__lock:
            return self.__status.get(job_id)

    def get_export(self, job_id):
        '''Path of a finished job's zip, or None.'''
        if job_id not in self.__jobs or \
                self.__get_state(job_id) != 'finished':
            return None

        return os.path.join(self.__out_dir, job_id + '.zip')

    def cancel(self, job_id):
        '''Cancels job.'''
        self.__jobs[job_id].cancel()
        return job_id

    def evict(self):
        '''Forgets jobs that ended more than ttl seconds ago.'''
        now = self.__clock()

        with self.__lock:
            expired = [job_id for job_id, ended in self.__ended.items()
                       if now - ended > self.__ttl]

            for job_id in expired:
                del self.__ended[job_id]
                self.__jobs.pop(job_id, None)
                self.__status.pop(job_id, None)

        for job_id in expired:
            path = os.path.join(self.__out_dir, job_id + '.zip')

            if os.path.exists(path):
                os.remove(path)

        if expired:
            _LOGGER.info('Evicted %d expired job(s)', len(expired))

        return expired

    def shutdown(self):
        '''Waits for queued jobs to finish.'''
        self.__executor.shutdown(wait=True)

    def event_fired(self, event):
        '''Records the latest event of a job.'''
        with self.__lock:
            self.__status[event['job_id']] = event

            if event['update']['status'] in _FINAL:
                self.__ended[event['job_id']] = self.__clock()

    def __get_state(self, job_id):
        '''Status string of a job.'''
        return self.get_status(job_id)['update']['status']

    def __get_response(self, job_id):
        '''Returns current progress for job id.'''
        return json.dumps(self.get_status(job_id))

    def __get_job(self, query):
        '''Builds the job a query asks for.'''
        app = query.get('app', 'Extract')

        if app == 'Extract':
            return ExtractJob(query, self.__out_dir)

        raise ValueError('Unknown app: ' + app)
