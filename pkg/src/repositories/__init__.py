from .ontic_repository import OnticRepository
from .file_repository import FileRepository

__all__ = [
    "OnticRepository",
    "FileRepository",
]
