import hashlib


def hash_file(filepath, chunk_size=1 << 20):
    """SHA-256 hex digest of a file, read in chunks."""

    digest = hashlib.sha256()

    with open(filepath, "rb") as file:
        for chunk in iter(lambda: file.read(chunk_size), b""):
            digest.update(chunk)

    return digest.hexdigest()


def hash_string(string):
    return hashlib.sha256(string.encode("utf-8")).hexdigest()
