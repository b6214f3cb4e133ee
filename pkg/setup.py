import os
from setuptools import setup, find_packages

def read(fname):
    with open(os.path.join(os.path.dirname(__file__), fname)) as f:
        return f.read()

setup(
    name = "multiwell_lab",
    version = "0.1.0",
    description = ("Numerical lab for vector multiwell elliptic systems: solvers, energy checks and concentration sets."),
    license = "MIT",
    long_description=read('README.md'),
    install_requires = [
        'numpy',
        'scipy>=1.12',
        'loguru',
        'python-dotenv',
    ],
    extras_require = {
        'test': [
            'pytest',
            'hypothesis',
        ],
    },
    packages = find_packages(where='src'),
    package_dir = {'': 'src'},
    package_data = {'': ['.env']},
    entry_points = {
        'console_scripts': [
            'mw_lab = multiwell_lab.MW_lab_wrappers.mw_lab:main',
        ]
    },
    include_package_data=True,
)
