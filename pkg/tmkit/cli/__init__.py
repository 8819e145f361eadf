from .command import BaseCommand, ExitStatus, UsageError
from .config import ConfigFile
from .console import ConsoleWriter, AnsiColor, color_enabled
