from setuptools import setup, find_packages
setup(
    name='GeneralizedCounters',
    version='0.1.0',
    packages=find_packages(include=['GeneralizedCounters', 'GeneralizedCounters.*']),
    install_requires=['numpy', 'pandas', 'torch', 'scipy', 'matplotlib'],
    extras_require={'tests': ['pytest']},
    entry_points={'console_scripts': ['generalized-counters=GeneralizedCounters.cli:main']},
)
