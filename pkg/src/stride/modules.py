"""
Dynamically load objects by reference.

A reference is a string ``'pkg.mdl'`` (a module) or ``'pkg.mdl:Symbol'``
(an attribute, dotted attribute paths allowed). Controller registries and
configurable factories are stored in the config as references.
"""

import importlib
import inspect


__all__ = [
    'load_ref',
    'make_ref',
    'object_config',
    'create_object',
]


def load_ref(obj_reference):
    """Loads an object from a python module.

       Parameters
       ----------
       obj_reference: str
           'pkg.mdl' or 'pkg.mdl:symbol' (the symbol may be a dotted path)

       Returns
       -------
       object
           The loaded object.

       Raises
       ------
       ImportError
           If the module cannot be imported.
       AttributeError
           If the symbol does not exist.
    """
    module_name, _, symbol = obj_reference.partition(":")
    obj = importlib.import_module(module_name)
    if symbol:
        for attr in symbol.split("."):
            obj = getattr(obj, attr)
    return obj


def make_ref(obj):
    """Makes the reference string that ``load_ref`` resolves back to ``obj``"""
    name = getattr(obj, '__qualname__', None) or getattr(obj, '__name__', None)
    if name is None:
        raise ValueError("cannot make a ref to {!r}: object has no name".format(obj))
    if inspect.ismodule(obj):
        return name
    module_name = getattr(obj, "__module__", None)
    if module_name is None:
        raise ValueError("cannot make a ref to {!r}: object has no module".format(obj))
    return module_name + ":" + name


def object_config(obj_type, defaults=True):
    """Config entry {'type': ref, 'kwargs': {...}} for a class, kwargs from its signature defaults"""
    entry = {'type': make_ref(obj_type)}
    if defaults:
        kwargs = {}
        for arg, parameter in inspect.signature(obj_type).parameters.items():
            if parameter.default is not parameter.empty:
                kwargs[arg] = parameter.default
        entry['kwargs'] = kwargs
    return entry


def create_object(entry, **extra_kwargs):
    """Instantiates a config entry built by ``object_config`` (or a bare reference string)"""
    if isinstance(entry, str):
        entry = {'type': entry}
    obj_type = load_ref(entry['type'])
    kwargs = dict(entry.get('kwargs', {}))
    kwargs.update(extra_kwargs)
    return obj_type(**kwargs)
