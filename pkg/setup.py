from setuptools import setup, find_packages

setup(name='joulebits',
      version='1.0.0',
      description='Bits-per-joule efficiency toolkit for learning and control on exact discrete systems',
      author='joulebits developers',
      packages=find_packages(exclude=["tests", "tests.*", "*.test", "*.test.*"]),
      install_requires=['numpy>=1.17', 'scipy>=1.4'],
      entry_points={'console_scripts': ['joulebits=joulebits.cli:main']},
      )
