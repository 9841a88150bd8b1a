#!/usr/bin/env python
# -*- coding: utf-8 -*-

import os
import sys
sys.path.insert(0, os.path.abspath('..'))

import sphinx_bootstrap_theme
import qlat

# -- General configuration ---------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.coverage',
    'sphinx.ext.doctest',
    'sphinx.ext.githubpages',
    'sphinx.ext.mathjax',
    'sphinx.ext.napoleon',
    'sphinx.ext.viewcode',
    # Must be loaded after napoleon
    'sphinx_autodoc_typehints'
]

napoleon_google_docstring = True
napoleon_use_param = True
napoleon_use_ivar = True

templates_path = ['_templates']

source_suffix = ['.rst', '.md']

master_doc = 'index'

project = u'qlat'
copyright = u"2026, qlat developers"
author = u"qlat developers"

version = qlat.__version__
release = qlat.__version__

language = None

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store']

pygments_style = 'sphinx'

todo_include_todos = False

# -- Options for HTML output -------------------------------------------

html_theme = 'bootstrap'
html_theme_path = sphinx_bootstrap_theme.get_html_theme_path()

html_static_path = ['_static']

# -- Options for HTMLHelp output ---------------------------------------

htmlhelp_basename = 'qlatdoc'

# -- Options for LaTeX output ------------------------------------------

latex_elements = {}

latex_documents = [
    (master_doc, 'qlat.tex',
     u'qlat Documentation',
     u'qlat developers', 'manual'),
]

# -- Options for manual page output ------------------------------------

man_pages = [
    (master_doc, 'qlat',
     u'qlat Documentation',
     [author], 1)
]

# -- Options for Texinfo output ----------------------------------------

texinfo_documents = [
    (master_doc, 'qlat',
     u'qlat Documentation',
     author,
     'qlat',
     'Exact arithmetic for integral quadratic lattices.',
     'Miscellaneous'),
]

source_parsers = {
   '.md': 'recommonmark.parser.CommonMarkParser',
}
