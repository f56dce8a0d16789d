import os
import traceback
import logging

from flask import Flask, request, jsonify
from flask_cors import CORS

from cuntzendo.core.data_loader import Data, element_from_dict, element_to_dict
from cuntzendo.core.errors import CuntzError
from cuntzendo.core.results_processor import izumi_to_dict
from cuntzendo.core.settings import using
from cuntzendo.cuntzendo import EndoCalc

logging.basicConfig(level=logging.INFO)

app = Flask(__name__)

# --- CORS Configuration ---
FLASK_ENV = os.environ.get('FLASK_ENV', 'production')

if FLASK_ENV == 'development':
    allowed_origins_str = os.environ.get('DEV_CORS_ORIGINS', "http://localhost:*,http://127.0.0.1:*")
    logging.info(f"Development CORS origins: {allowed_origins_str}")
else:
    # Production only talks to explicitly listed origins; nothing by default.
    allowed_origins_str = os.environ.get('PROD_CORS_ORIGINS', "")
    if not allowed_origins_str:
        logging.info("PROD_CORS_ORIGINS environment variable is not set, cross-origin requests are refused")
    else:
        logging.info(f"Production CORS origins: {allowed_origins_str}")

allowed_origins = [origin.strip() for origin in allowed_origins_str.split(',') if origin.strip()]

if FLASK_ENV == 'development' and not allowed_origins:
    allowed_origins = ["http://localhost:*", "http://127.0.0.1:*"]

CORS(app,
     origins=allowed_origins,
     methods=["GET", "POST", "OPTIONS"],
     allow_headers=["Content-Type", "Authorization"],
     supports_credentials=True,
     expose_headers=["Content-Length"])


def _calc(payload):
    """EndoCalc with the request's [settings] table layered over the reference file."""
    data = Data().load_reference()
    data.load_config(payload.get('settings', {}))
    data.load_environment()
    return EndoCalc(data.settings)


def _handle(compute):
    if not request.is_json:
        return jsonify({"error": "Request must be JSON"}), 400
    payload = request.get_json(silent=True)
    if not isinstance(payload, dict):
        return jsonify({"error": "Request body must be a JSON object"}), 400
    try:
        calc = _calc(payload)
        with using(calc.settings):
            return jsonify(compute(calc, payload))
    except CuntzError as e:
        return jsonify({"error": str(e)}), 400
    except Exception as e:
        traceback.print_exc()
        return jsonify({"error": f"Calculation failed: {str(e)}"}), 500


def _element(payload, key='element'):
    return element_from_dict(payload.get(key), key)


@app.route('/analyze', methods=['POST'])
def analyze():
    """Gauge degrees, level, unitarity and normalizer tests of `element`."""
    return _handle(lambda calc, payload: calc.analyze(_element(payload)))


@app.route('/decide', methods=['POST'])
def decide():
    def compute(calc, payload):
        args = payload.get('arguments', {})
        calc.decide(_element(payload), k=args.get('k'), oracle=bool(args.get('oracle', False)))
        return calc.results
    return _handle(compute)


@app.route('/compose', methods=['POST'])
def compose():
    return _handle(lambda calc, payload: element_to_dict(calc.compose(_element(payload, 'u'),
                                                                      _element(payload, 'w'))))


@app.route('/izumi', methods=['POST'])
def izumi():
    def compute(calc, payload):
        elements, report = calc.izumi(str(payload.get('group', '2')))
        return {'elements': {name: element_to_dict(x) for name, x in elements.items()},
                'report': izumi_to_dict(report)}
    return _handle(compute)


def main():
    """Entry point for running the Flask server."""
    if not os.environ.get('FLASK_ENV'):
        os.environ['FLASK_ENV'] = 'development'
        logging.info("FLASK_ENV not set, defaulting to 'development' for local run.")

    app.run(debug=(os.environ.get('FLASK_ENV') == 'development'),
            host='0.0.0.0',
            port=int(os.environ.get("PORT", 5001)))


if __name__ == '__main__':
    main()
