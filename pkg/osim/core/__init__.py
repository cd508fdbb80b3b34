# osim/core/__init__.py
