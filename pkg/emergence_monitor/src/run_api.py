#!/usr/bin/env python
"""
Script to run the Emergence Monitor API server.
"""

import logging

from .api.experiment_api import app

if __name__ == "__main__":
    logging.basicConfig(level=logging.INFO)
    app.run(host='0.0.0.0', port=5000)
