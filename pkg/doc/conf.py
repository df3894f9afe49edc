#!/usr/bin/env python3
# -*- coding: utf-8 -*-
# oplab documentation build configuration file.

import os
import sys

sys.path.insert(0, os.path.abspath('..'))

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'recommonmark',
]

source_suffix = ['.rst', '.md']

master_doc = 'index'

project = 'oplab'
copyright = '2024'
author = 'oplab developers'

version = ''
release = ''

language = None

exclude_patterns = ['build']

pygments_style = 'sphinx'

todo_include_todos = False

# -- Options for HTML output ----------------------------------------------

html_theme = 'alabaster'

htmlhelp_basename = 'oplab'

smartquotes = False

html_js_files = [
    'https://cdn.jsdelivr.net/npm/mathjax@3/es5/tex-mml-chtml.js'
]
