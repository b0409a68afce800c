from setuptools import find_packages, setup

setup(
    name="prplab",
    version="0.1.0",
    packages=find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "pydantic>=2.0.0",
        "python-dotenv==1.1.1",
        "sympy>=1.13",
    ],
    author="prplab developers",
    description="Exact-rational checks of predictable representation properties",
    long_description=open("README.md", "r", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    package_dir={"prplab": "prplab"},
    package_data={"prplab": ["data/models/*.json"]},
    entry_points={"console_scripts": ["prplab = prplab.cli:main"]},
)
