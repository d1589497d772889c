from setuptools import setup, find_packages

setup(
    name="efrl",
    version="0.1.0",
    packages=find_packages(exclude=["tests"]),
    package_data={"efrl._config": ["default.cfg"]},
)
