TMKIT_VERSION = ["0", "1", "0"]


def get_version():
    return ".".join(TMKIT_VERSION)


__version__ = get_version()
