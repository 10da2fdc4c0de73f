'''
(c) University of Liverpool 2020

Licensed under the MIT License.

To view a copy of this license, visit <http://opensource.org/licenses/MIT/>..

@author: neilswainston
'''
# pylint: disable=invalid-name
import json
import logging
import os
import sys
import tempfile

from flask import Flask, jsonify, request, Response, send_file
from werkzeug.exceptions import HTTPException

from liv_vein.web import manager


_LOGGER = logging.getLogger(__name__)

_EXPORT_FOLDER = os.environ.get('VEIN_EXPORT_DIR',
                                os.path.join(tempfile.gettempdir(),
                                             'liv_vein'))

app = Flask(__name__)
app.config['MAX_CONTENT_LENGTH'] = 64 * 1024 * 1024

_MANAGER = manager.Manager(_EXPORT_FOLDER,
                           ttl=float(os.environ.get('VEIN_JOB_TTL', 3600)))


@app.route('/submit', methods=['POST'])
def submit():
    '''Queues an extraction job.'''
    return json.dumps({'job_id': _MANAGER.submit(request.data)})


@app.route('/status/<job_id>')
def status(job_id):
    '''Returns the latest event of a job.'''
    event = _MANAGER.get_status(job_id)

    if event is None:
        return _error('Unknown job: ' + job_id, 404)

    return jsonify(event)


@app.route('/progress/<job_id>')
def progress(job_id):
    '''Streams job progress.'''
    return Response(_MANAGER.get_progress(job_id),
                    mimetype='text/event-stream')


@app.route('/cancel/<job_id>')
def cancel(job_id):
    '''Cancels job.'''
    return _MANAGER.cancel(job_id)


@app.route('/result/<job_id>')
def get_result(job_id):
    '''Returns the zip of a finished job.'''
    path = _MANAGER.get_export(job_id)

    if path is None or not os.path.exists(path):
        return _error('No result for job: ' + job_id, 404)

    return send_file(path,
                     download_name=job_id + '.zip',
                     mimetype='application/zip',
                     as_attachment=True)


@app.errorhandler(KeyError)
def handle_unknown(error):
    '''Unknown job ids.'''
    return _error('Unknown job: %s' % error, 404)


@app.errorhandler(ValueError)
def handle_invalid(error):
    '''Invalid submissions.'''
    return _error(str(error), 400)


@app.errorhandler(Exception)
def handle_error(error):
    '''Handles errors.'''
    if isinstance(error, HTTPException):
        return error

    _LOGGER.exception('Unhandled error')
    return _error(str(error), 500)


def _error(message, code):
    '''JSON error response.'''
    response = jsonify({'message': message})
    response.status_code = code
    return response


def main(argv):
    '''main method.'''
    logging.basicConfig(format='%(asctime)s | %(levelname)s | %(message)s',
                        level=logging.INFO)

    if argv:
        app.run(host='0.0.0.0', threaded=True, port=int(argv[0]))
    else:
        app.run(host='0.0.0.0', threaded=True)


if __name__ == '__main__':
    main(sys.argv[1:])
