#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# tbasic documentation build configuration file.

import os
import sys
sys.path.insert(0, os.path.abspath('../..'))

import tbasic

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.viewcode',
    'sphinx.ext.autosectionlabel']

templates_path = ['_templates']

source_suffix = '.rst'

master_doc = 'index'

project = 'tbasic'
copyright = '2024, the tbasic developers'
author = 'the tbasic developers'

version = tbasic.__version__
release = version

language = None

exclude_patterns = []

pygments_style = 'sphinx'

todo_include_todos = False


# -- Options for HTML output ----------------------------------------------

html_theme = 'sphinx_rtd_theme'

html_static_path = ['_static']

htmlhelp_basename = 'tbasicdoc'


# -- Options for LaTeX output ---------------------------------------------

latex_elements = {}

latex_documents = [
    (master_doc, 'tbasic.tex', 'tbasic Documentation',
     'the tbasic developers', 'manual'),
]


# -- Options for manual page output ---------------------------------------

man_pages = [
    (master_doc, 'tbasic', 'tbasic Documentation',
     [author], 1)
]


# -- Options for Texinfo output -------------------------------------------

texinfo_documents = [
    (master_doc, 'tbasic', 'tbasic Documentation',
     author, 'tbasic', 'Information diffusion learning and simulation.',
     'Miscellaneous'),
]
