# osim/routers/__init__.py
