from setuptools import setup, find_packages
import re

import sys


if sys.version_info < (3, 7):
    exit('Python < 3.7 is not supported.  You are currently running Python {}.{}.{}'.format(*sys.version_info[:3]))

with open('tbasic/__init__.py') as f:
    version = re.search(r'^__version__\s*=\s*[\'"]([^\'"]*)[\'"]', f.read(), re.MULTILINE).group(1)

if not version:
    raise RuntimeError('version is not set.')

with open('README.rst', 'r', encoding='utf-8') as f:
    readme = f.read()

setup(name='python-tbasic',
      author='the tbasic developers',
      version=version,
      packages=find_packages(exclude=('tests', 'tests.*')),
      license='BSD 3-Clause',
      description='Learn and simulate the temporal dynamics of information diffusion in social networks.',
      long_description=readme,
      include_package_data=True,
      install_requires=['numpy>=1.17', 'networkx>=2.4'],
      entry_points={
          'console_scripts': [
              'tbasic = tbasic.entry_points.tbasic_command:main'
          ]
      },
      classifiers=[
          'Development Status :: 3 - Alpha',
          'License :: OSI Approved :: BSD License',
          'Intended Audience :: Science/Research',
          'Natural Language :: English',
          'Operating System :: OS Independent',
          'Programming Language :: Python :: 3.7',
          'Topic :: Scientific/Engineering :: Information Analysis',
          'Topic :: Sociology',
      ]
      )
