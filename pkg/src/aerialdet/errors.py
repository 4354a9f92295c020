"""Error types shared across the package.

The CLI maps these onto distinct exit codes: configuration problems exit
with 1, unreadable or malformed image files with 2, inconsistent input
data (e.g. mixed frame sizes) with 3.
"""


class ConfigError(ValueError):
    """Invalid or incomplete pipeline configuration."""


class ImageFormatError(ValueError):
    """Malformed image file (bad header, truncated body, ...)."""


class UnsupportedImageError(ImageFormatError):
    """Image file is readable but uses an unsupported format or bit depth."""


class DataError(ValueError):
    """Input data is internally inconsistent (frame sizes, GT files, ...)."""
