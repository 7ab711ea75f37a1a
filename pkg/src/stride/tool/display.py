"""
Print utils
"""

import contextlib
import sys

import termcolor

from ..config import get_config_section, register_config


__all__ = [
    'Printer',
]


register_config(
    name="display",
    default={
        "colored": True,
        "float_format": "{:.4g}",
    })


class Printer(object):
    def __init__(self, colored=None, float_format=None, file=None):
        kwargs = {
            'colored': colored,
            'float_format': float_format,
        }
        config = None
        if any(value is None for value in kwargs.values()):
            config = get_config_section("display")
        for key, value in kwargs.items():
            if value is None:
                value = config[key]
            setattr(self, key, value)
        self.file = file

    def __call__(self, *args, **kwargs):
        if 'file' not in kwargs:
            kwargs['file'] = sys.stdout if self.file is None else self.file
        print(*args, **kwargs)

    @contextlib.contextmanager
    def set_file(self, file):
        old_file = self.file
        self.file = file
        try:
            yield self
        finally:
            self.file = old_file

    def _colored(self, string, color):
        if self.colored:
            return termcolor.colored(string, color)
        else:
            return string

    def blue(self, string):
        return self._colored(string, "blue")

    def red(self, string):
        return self._colored(string, "red")

    def green(self, string):
        return self._colored(string, "green")

    def bold(self, string):
        if self.colored:
            return termcolor.colored(string, attrs=["bold"])
        else:
            return string

    def repr_value(self, value):
        if isinstance(value, float):
            return self.float_format.format(value)
        if value is None:
            return "-"
        return str(value)

    def print_mapping(self, mapping, header=None, indent=""):
        """Nested mapping as ``key: value`` lines"""
        if header:
            self(self.bold("## " + header))
        for key, value in mapping.items():
            if isinstance(value, dict):
                self("{}{}:".format(indent, self.blue(str(key))))
                self.print_mapping(value, indent=indent + "    ")
            elif isinstance(value, (list, tuple)):
                self("{}{}: {}".format(indent, self.blue(str(key)),
                                       " ".join(self.repr_value(item) for item in value)))
            else:
                self("{}{}: {}".format(indent, self.blue(str(key)), self.repr_value(value)))

    def print_table(self, rows, columns, header=None):
        """Aligned table of ``rows`` (mappings) over ``columns``"""
        if header:
            self(self.bold("## " + header))
        table = [tuple(column.upper() for column in columns)]
        for row in rows:
            table.append(tuple(self.repr_value(row.get(column)) for column in columns))
        lengths = [max(len(line[i]) for line in table) for i in range(len(columns))]
        aligns = ['<'] + ['>'] * (len(columns) - 1)
        fmt = " ".join("{{:{a}{l}s}}".format(a=a, l=l) for a, l in zip(aligns, lengths))
        for index, line in enumerate(table):
            text = fmt.format(*line)
            self(self.bold(text) if index == 0 else text)

    def print_stats(self, profiler):
        rows = []
        for label, timing in sorted(profiler.items(), key=lambda item: item[1].total_time):
            rows.append({
                "label": label,
                "count": timing.count,
                "total": timing.total_time,
                "mean": timing.average_time,
                "p95": timing.percentile(95),
            })
        self.print_table(rows, ("label", "count", "total", "mean", "p95"), header="Stats")

    def error(self, code_name, message):
        """One machine-readable error line"""
        self("error: {}: {}".format(code_name, message))
