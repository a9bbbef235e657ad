# -*- coding: utf-8 -*-
"""Cross-cutting helpers: logging, config, validation, metrics, retries, parallel maps."""
