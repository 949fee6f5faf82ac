from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="blockdelta",
    version="0.1.0",
    author="Your Name",
    author_email="your.email@example.com",
    description="Exact distributions of differences of binary block-counting functions",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/yourusername/blockdelta",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "numpy>=1.21",
    ],
    extras_require={
        "test": [
            "pytest>=7.0",
            "pytest-mock>=3.10.0",
            "scipy>=1.7",
        ],
    },
    entry_points={
        "console_scripts": [
            "blockdelta=blockdelta.cli:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.8",
)
