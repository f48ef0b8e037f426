# Adding this solved the ModuleNotFoundError when running pytest
