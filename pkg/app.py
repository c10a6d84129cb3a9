from flask import Flask, jsonify, request
import logging
from pathlib import Path
from dotenv import load_dotenv

from ccic import settings
from ccic.boolfun import NAMED_FUNCTIONS, generate_named, parse_index
from ccic.cli import covers_report, ic_report, run_report, verify_report
from ccic.errors import CcicError, UnknownFunctionError
from ccic.protocols import ProtocolKind
from ccic.witness import Mode

# Load environment variables
load_dotenv()

app = Flask(__name__)
app.json.sort_keys = False

logger = logging.getLogger(__name__)

FUNCTIONS_DIR = Path(__file__).parent / 'data' / 'functions'


def _int_arg(name, default=None):
    raw = request.args.get(name)
    if raw is None or raw == '':
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f'{name} must be an integer, got {raw!r}') from None


def _budget_arg():
    budget = _int_arg('budget')
    if budget is not None and budget < 0:
        raise ValueError(f'budget must be >= 0, got {budget}')
    return budget


def _function_from_request():
    """Build the function named by ?fn=&n=&seed= (RANDOM needs a seed)"""
    name = request.args.get('fn')
    n = _int_arg('n')
    if not name or n is None:
        raise ValueError('fn and n are required')
    return generate_named(name, n, _int_arg('seed'))


def _pair_from_request(f):
    x, y = request.args.get('x'), request.args.get('y')
    if x is None or y is None:
        raise ValueError('x and y are required')
    return parse_index(x, f.n), parse_index(y, f.n)


@app.errorhandler(UnknownFunctionError)
def unknown_function(e):
    return jsonify({'error': str(e)}), 404


@app.errorhandler(CcicError)
@app.errorhandler(ValueError)
def bad_request(e):
    logger.info('rejected %s: %s', request.path, e)
    return jsonify({'error': str(e)}), 400


@app.errorhandler(404)
def not_found(e):
    return jsonify({'error': f'no such endpoint: {request.path}'}), 404


@app.route('/api/functions')
def api_functions():
    """Named generators and the sample .bfn files shipped under data/functions"""
    samples = sorted(p.name for p in FUNCTIONS_DIR.glob('*.bfn')) if FUNCTIONS_DIR.exists() else []
    return jsonify({'named': list(NAMED_FUNCTIONS), 'samples': samples, 'max_n': settings.MAX_N})


@app.route('/api/covers')
def api_covers():
    f = _function_from_request()
    return jsonify(covers_report(f, _int_arg('z')))


@app.route('/api/verify')
def api_verify():
    f = _function_from_request()
    theorem = request.args.get('theorem', 'yes')
    tol = _int_arg('tol', settings.TOLERANCE_BITS)
    if tol < 0:
        raise ValueError(f'tolerance must be >= 0, got {tol}')
    pair = _pair_from_request(f) if 'x' in request.args or 'y' in request.args else None
    payload, _ = verify_report(f, theorem, _budget_arg(), tol, pair)
    return jsonify(payload)


@app.route('/api/run')
def api_run():
    f = _function_from_request()
    kind = ProtocolKind.parse(request.args.get('protocol', 'fig1'))
    x, y = _pair_from_request(f)
    guess = request.args.get('guess', 'auto')
    return jsonify(run_report(f, kind, x, y, guess, _budget_arg()))


@app.route('/api/ic')
def api_ic():
    f = _function_from_request()
    x, y = _pair_from_request(f)
    mode = Mode(request.args.get('mode', 'yes'))
    model = request.args.get('model', 'structured')
    return jsonify(ic_report(f, x, y, mode, model, _budget_arg(), _int_arg('lmax')))


if __name__ == '__main__':
    app.run(debug=True, host=settings.HOST, port=settings.PORT)
