from flask import Flask, request, jsonify
from ..experiment_service import ExperimentService

app = Flask(__name__)

# Bad requests and missing inputs map to 400, anything else to 500.
CLIENT_ERRORS = (ValueError, FileNotFoundError)


def _service_from_request():
    """
    Build the service from the request body.

    Accepts either:
    1. A configuration name in the request body: {"config_name": "synth_small"}
    2. A complete configuration JSON in the request body

    An optional "overrides" object is applied on top of a named configuration.
    """
    data = request.get_json(silent=True)
    if not data:
        return None
    if "config_name" in data:
        return ExperimentService(data["config_name"], overrides=data.get("overrides"))
    return ExperimentService(data)


@app.route('/api/emergence/run', methods=['POST'])
def run_experiment():
    """
    Endpoint to run injection experiments.

    Returns:
        JSON response containing:
        - output_dir: Where the artifacts were written
        - reports: Mean and per-run metrics per (category, rate, window, method)
        - combined: Category means per (rate, window, method)
        - manifest: Path of the run manifest
    """
    try:
        service = _service_from_request()
        if service is None:
            return jsonify({"error": "No data provided"}), 400
        return jsonify(service.run())
    except CLIENT_ERRORS as e:
        return jsonify({"error": str(e)}), 400
    except Exception as e:
        return jsonify({"error": str(e), "context": getattr(e, "context", {})}), 500


@app.route('/api/emergence/gold', methods=['POST'])
def build_gold_standard():
    """
    Endpoint to build the gold standard of a configuration.

    Returns:
        JSON with the gold words per category and the written file paths
    """
    try:
        service = _service_from_request()
        if service is None:
            return jsonify({"error": "No data provided"}), 400
        gold = service.build_gold()
        paths = service.write_gold(gold=gold)
        return jsonify({
            "gold": gold.to_dict(),
            "training_accuracy": gold.training_accuracy,
            "files": paths,
        })
    except CLIENT_ERRORS as e:
        return jsonify({"error": str(e)}), 400
    except Exception as e:
        return jsonify({"error": str(e)}), 500


@app.route('/api/emergence/configurations', methods=['GET'])
def list_configurations():
    """
    Endpoint to list all available configurations.

    Returns:
        JSON with a list of configuration names
    """
    try:
        configs = ExperimentService.list_available_configurations()
        return jsonify({"configurations": configs})
    except Exception as e:
        return jsonify({"error": str(e)}), 500


@app.route('/api/emergence/validate-config', methods=['POST'])
def validate_configuration():
    """
    Endpoint to validate a configuration.

    Accepts a configuration JSON in the request body.

    Returns:
        JSON with validation results
    """
    try:
        data = request.get_json(silent=True)

        if not data:
            return jsonify({"error": "No configuration provided"}), 400

        validation_result = ExperimentService.validate_configuration(data)
        return jsonify(validation_result)
    except Exception as e:
        return jsonify({"error": str(e)}), 500


if __name__ == '__main__':
    app.run(debug=True)
