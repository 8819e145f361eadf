import os
from pathlib import Path

import toml

from tmkit.engine import DEFAULT_MAX_FIRINGS


class ConfigFile:
    CONF_FILE = "tmkit.toml"
    ENV_FILE = "TMKIT_CONFIG"
    KEY_ENGINE = "engine"
    KEY_MAX_FIRINGS = "max_firings"
    KEY_OUTPUT = "output"
    KEY_COLOR = "color"

    # table -> {key: expected type}
    SCHEMA = {
        KEY_ENGINE: {KEY_MAX_FIRINGS: int},
        KEY_OUTPUT: {KEY_COLOR: bool},
    }

    def __init__(self, file: str = None):
        if file is not None:
            self._file = file
        else:
            self._file = os.getenv(self.ENV_FILE, self.CONF_FILE)

    @property
    def file(self) -> str:
        return self._file

    def exists(self) -> bool:
        p = Path(self._file)
        return p.exists() and p.is_file()

    @classmethod
    def defaults(cls) -> dict:
        return {
            cls.KEY_ENGINE: {cls.KEY_MAX_FIRINGS: DEFAULT_MAX_FIRINGS},
            cls.KEY_OUTPUT: {cls.KEY_COLOR: None},
        }

    def load(self) -> dict:
        """
        Loads the TOML configuration file, if present
        Missing keys keep their defaults; unknown keys inside a known table raise RuntimeError
        :return: dict
        """
        result = self.defaults()
        if not self.exists():
            return result

        config = toml.load(self._file)
        for table, keys in self.SCHEMA.items():
            if table not in config.keys():
                continue
            if type(config[table]) is not dict:
                raise RuntimeError("'{}' must be a table in {}".format(table, self._file))
            for k, v in config[table].items():
                if k not in keys.keys():
                    raise RuntimeError(
                        "unknown key '{}' in table '{}' in {}".format(k, table, self._file)
                    )
                if type(v) is not keys[k]:
                    raise RuntimeError(
                        "invalid value for '{}.{}' in {}".format(table, k, self._file)
                    )
                result[table][k] = v

        if result[self.KEY_ENGINE][self.KEY_MAX_FIRINGS] < 1:
            raise RuntimeError(
                "'{}.{}' must be positive in {}".format(self.KEY_ENGINE, self.KEY_MAX_FIRINGS, self._file)
            )
        return result
