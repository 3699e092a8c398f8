"""File storage for datasets, reconstructions and exports."""

from .file_manager import FileManager

__all__ = ['FileManager']
