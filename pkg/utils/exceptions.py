"""
Exception hierarchy shared by every app.

Management commands turn any LmrlError into a one-line CommandError, so
messages raised here should stay on a single line.
"""


class LmrlError(Exception):
    """Base class for all domain errors"""

    @property
    def kind(self):
        return type(self).__name__

    def one_line(self):
        return ' '.join(str(self).split())


class DimensionError(LmrlError, ValueError):
    """Operand shapes cannot be combined"""


class ConfigurationError(LmrlError):
    """A layer, generator or run configuration is invalid"""


class UsageError(LmrlError):
    """An API or CLI entry point was called incorrectly"""


class TrainingError(LmrlError):
    """Optimisation diverged (non-finite loss or gradient)"""


class GenerationError(LmrlError):
    """Synthetic data cannot be produced for the requested configuration"""


class AnnotationError(LmrlError):
    """Cycle annotations are inconsistent with the sequence"""


class SupervisionError(LmrlError):
    """Targets passed to a loss are invalid"""


class DataError(LmrlError):
    """Files on disk or metric inputs are missing, corrupted or inconsistent"""


def format_validation_errors(detail, prefix=''):
    """Flatten a DRF ``ValidationError.detail`` into ``field: message; ...``."""
    if isinstance(detail, dict):
        parts = []
        for key, value in detail.items():
            if key == 'non_field_errors':
                path = prefix
            else:
                path = f'{prefix}.{key}' if prefix else key
            parts.append(format_validation_errors(value, path))
        return '; '.join(p for p in parts if p)
    if isinstance(detail, (list, tuple)):
        if all(isinstance(item, (dict, list, tuple)) for item in detail):
            return '; '.join(
                format_validation_errors(item, f'{prefix}[{index}]') for index, item in enumerate(detail) if item
            )
        messages = ', '.join(str(item) for item in detail)
        return f'{prefix}: {messages}' if prefix else messages
    return f'{prefix}: {detail}' if prefix else str(detail)
