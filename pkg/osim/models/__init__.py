# osim/models/__init__.py
