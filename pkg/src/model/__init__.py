from src.base.commons import get_last_git_tag

__package_version__ = "0.1.0"

try:
    __version__ = get_last_git_tag()
except Exception:
    __version__ = __package_version__
