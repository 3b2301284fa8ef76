import setuptools

setuptools.setup(
    name='parley',
    version='0.1.0',
    author='Parley developers',
    description=(
        'Exact analysis of mediated and unmediated Bayesian communication '
        'between two agents'
    ),
    long_description=(
        'Parley is a Python package for modelling strategic communication '
        'between two privately informed agents, either through a trusted '
        'mediator or through a multi-round Bayesian conversation. It '
        'simulates the posterior beliefs protocols induce, decides whether '
        'a distribution of posteriors can be induced, audits ex-ante, '
        'interim, ex-post and non-committed individual rationality and '
        'designs optimal protocols with exact rational linear programming.'
    ),
    packages=['parley'],
    package_data={'parley': ['data/*.json']},
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Programming Language :: Python :: 3',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering',
        'Intended Audience :: Science/Research',
        'Intended Audience :: Developers'
    ],
    keywords='information design persuasion signalling linear programming',
    license='MIT',
    install_requires=['numpy>=1.20', 'pydantic>=2'],
    python_requires='>=3.9',
    extras_require={
        'parallel': ['multiprocess>=0.70'],
        'test': ['pytest>=6', 'scipy>=1.6'],
    },
    entry_points={
        'console_scripts': ['parley = parley.cli:main'],
    }
)
