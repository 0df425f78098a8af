# Sphinx configuration of the pybgk documentation.
import os
import sys
sys.path.insert(0, os.path.abspath('..'))

version = {}
with open(os.path.join(os.path.dirname(__file__), '..', 'pybgk', 'version.py')) as fh:
    exec(fh.read(), version)

project = 'pybgk'
copyright = '2026, the pybgk developers'
author = 'the pybgk developers'
release = version['__version__']
html_context = dict(versions=release)

extensions = ['sphinx.ext.napoleon',
              'sphinx.ext.mathjax',
              'sphinx_mdinclude',
              'autoapi.extension']

source_suffix = ['.rst', '.md']
autoapi_type = 'python'
autoapi_dirs = ['../pybgk']
autoapi_ignore = ['*/version.py']
autoapi_add_toctree_entry = False
autosectionlabel_prefix_document = True
napoleon_numpy_docstring = True

templates_path = ['_templates']
exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store', '_templates']

html_theme = 'sphinx_rtd_theme'
html_static_path = []
