"""
Canonical JSON encoding and file helpers shared by all joulebits objects.

Objects expose ``encode()`` returning plain JSON data and a ``decode()``
classmethod building the object back. This module turns that data into
byte-stable text: sorted keys, compact separators and floats written with
17 significant digits.
"""
import contextlib
import json
import math
import os
import tempfile

import numpy as np

from joulebits.constants import FLOAT_DIGITS
from joulebits.types import Error, SerializationError, SpecParseError, ValidationError


def _encode_float(value):
    if math.isnan(value) or math.isinf(value):
        raise SerializationError("Non-finite value %r cannot be serialized" % value)
    text = format(value, '.%dg' % FLOAT_DIGITS)
    if '.' not in text and 'e' not in text and 'n' not in text:
        text += '.0'
    return text


def _encode(obj, path):
    if obj is None:
        return 'null'
    if isinstance(obj, (bool, np.bool_)):
        return 'true' if obj else 'false'
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        try:
            return _encode_float(float(obj))
        except SerializationError:
            raise SerializationError("Non-finite value at %s" % (path or '<root>'))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if hasattr(obj, 'encode') and not isinstance(obj, (bytes, str)) and callable(obj.encode):
        return _encode(obj.encode(), path)
    if hasattr(obj, '_asdict'):
        return _encode(obj._asdict(), path)
    if isinstance(obj, dict):
        items = []
        for key in sorted(obj, key=str):
            items.append(json.dumps(str(key), ensure_ascii=False) + ':' +
                         _encode(obj[key], '%s.%s' % (path, key) if path else str(key)))
        return '{' + ','.join(items) + '}'
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), path)
    if isinstance(obj, (list, tuple)):
        return '[' + ','.join(_encode(v, '%s[%d]' % (path, i)) for i, v in enumerate(obj)) + ']'
    raise SerializationError("Cannot serialize %s at %s" % (type(obj).__name__, path or '<root>'))


def canonical_dumps(obj):
    """Serialize an object into canonical JSON text.

    Args:
        obj: Plain JSON data, a namedtuple, a numpy array or an object with an
            ``encode()`` method.

    Returns:
        str: Canonical JSON text, without trailing newline.

    Raises:
        joulebits.types.SerializationError: If a NaN or infinite float is met.
    """
    return _encode(obj, '')


def _reject_constant(name):
    raise ValueError("non-finite constant %s is not allowed" % name)


def loads(text, source='<string>'):
    """Parse JSON text, reporting failures with their location."""
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as e:
        location = "%s:%d:%d" % (source, e.lineno, e.colno)
        raise SpecParseError("%s: %s" % (location, e.msg), location)
    except ValueError as e:
        raise SpecParseError("%s: %s" % (source, e), source)


def load_json(path):
    """Read a UTF-8 JSON file.

    Raises:
        joulebits.types.SpecParseError: If the file is missing or malformed.
    """
    try:
        with open(path, 'r', encoding='utf-8') as f:
            text = f.read()
    except (OSError, UnicodeDecodeError) as e:
        raise SpecParseError("%s: %s" % (path, e), path)
    return loads(text, path)


def atomic_write(path, text):
    """Write text to a file through a temporary file and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.' + os.path.basename(path), suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


@contextlib.contextmanager
def decoding(what):
    """Reports a missing or malformed field of ``what`` as a ValidationError.

    joulebits errors raised inside the block pass through unchanged.
    """
    try:
        yield
    except Error:
        raise
    except KeyError as e:
        raise ValidationError("%s is missing field %s" % (what, e))
    except (AttributeError, TypeError, ValueError, OverflowError) as e:
        raise ValidationError("%s has a malformed field: %s" % (what, e))
