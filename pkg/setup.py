import re
from setuptools import setup
from pathlib import Path

here = Path(__file__).parent
init = (here / 'rsvddpd' / '__init__.py').read_text()
version = re.search(r'__version__ = "([^"]+)"', init).group(1)
long_description = (here / 'README.md').read_text()

setup(
    name='rsvddpd',
    version=version,
    author='Scott',
    packages=['rsvddpd', 'rsvddpd.core', 'rsvddpd.video', 'rsvddpd.eval'],
    include_package_data=True,
    license='MIT',
    description='Robust SVD with the density power divergence',
    long_description=long_description,
    long_description_content_type="text/markdown",
    install_requires=['numpy>=1.22', 'scipy>=1.8'],
    entry_points={'console_scripts': ['rsvddpd = rsvddpd.cli:main']},
    classifiers = [
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
