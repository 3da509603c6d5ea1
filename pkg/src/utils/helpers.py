"""General utility functions"""

import hashlib


def content_hash(data: bytes) -> str:
    """Git-style blob hash (sha1 over 'blob <size>\\0' + content)"""
    header = f"blob {len(data)}\0".encode()
    return hashlib.sha1(header + data).hexdigest()
