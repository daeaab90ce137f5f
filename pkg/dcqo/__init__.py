"""
See PEP 440 (https://peps.python.org/pep-0440/)

Release logic:
 1. Remove ".devX" from __version__ (below)
 2. git add dcqo/__init__.py
 3. git commit -m 'Bump to <version>'
 4. git tag <version>
 5. git push
 6. ensure that all tests pass, including the slow ones (pytest -m slow)
 7. git push --tags
 8. pip install --upgrade pip wheel twine
 9. python setup.py clean --all
10. python setup.py sdist bdist_wheel
11. twine upload dist/*
12. bump the version, append ".dev0" to __version__
13. git add dcqo/__init__.py
14. git commit -m 'Start with <version>'
15. git push
"""
__version__ = '0.3.0.dev0'
