from setuptools import setup
import re
import os

PACKNAME = 'abmsim'
AUTHOR = 'abmsim developers'
EMAIL = ''
URL = ''
LICENSE = 'BSD'
DESCRIPTION = 'Agent based epidemic simulation: norm-based to graph-based spatial reduction'
VERSION = re.findall(r"__version__ = \"(.*?)\"",
                     open(os.path.join("abmsim", "__init__.py")).read())[0]
setup(
    name=PACKNAME,
    version=VERSION,
    description=DESCRIPTION,
    author=AUTHOR,
    author_email=EMAIL,
    license=LICENSE,
    packages=['abmsim'],
    url=URL,
    python_requires='>=3.8',
    install_requires=[
        "pandas >= 1.2.0",
        "numpy >= 1.17.0",
        "shapely >= 1.8.0",
        "numba",
        "pyyaml"
    ],
    extras_require={
        'test': ["pytest"]
    },
    entry_points={
        'console_scripts': ['abmsim = abmsim.cli:main']
    }
)
