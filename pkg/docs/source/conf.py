# Configuration file for the Sphinx documentation builder.
#
# For the full list of options see
# https://www.sphinx-doc.org/en/master/usage/configuration.html

import os
import sys
from importlib.metadata import version as _version

sys.path.insert(0, os.path.abspath("../../src"))


# -- Project information -----------------------------------------------------

project = "spanner-forge"
copyright = "2026, spanner-forge developers"
author = "spanner-forge developers"
version = _version("spanner-forge")


# -- General configuration ---------------------------------------------------

extensions = [
    "sphinx.ext.viewcode",
    "sphinx.ext.coverage",
    "sphinx.ext.napoleon",
    "sphinx.ext.autosectionlabel",
    "m2r2",
    "sphinx.ext.autodoc",
    "sphinx.ext.autosummary",
]
add_module_names = False
# Autodoc settings
autodoc_default_options = {"show-inheritance": True}
autodoc_typehints = "both"
autodoc_typehints_format = "short"
autosummary_generate = True

# Make sure the target is unique
autosectionlabel_prefix_document = True
autosectionlabel_maxdepth = 2

exclude_patterns = ["_build"]


# -- Options for HTML output -------------------------------------------------

html_theme = "pydata_sphinx_theme"
html_theme_options = {
    "logo": {
        "text": "spanner-forge",
    }
}

# Napoleon settings
napoleon_google_docstring = True
napoleon_numpy_docstring = False
napoleon_include_init_with_doc = False
napoleon_include_private_with_doc = False
napoleon_include_special_with_doc = True
napoleon_use_admonition_for_examples = True
napoleon_use_param = True
napoleon_use_rtype = True

highlight_language = "none"
