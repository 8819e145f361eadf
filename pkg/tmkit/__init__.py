from .version import __version__, get_version
from .core import Bundle, StaticModel, Diagnostic
from .dsl import load_model, load_model_file, parse_script, parse_script_file
from .engine import Interpreter, Trace, run_script
from .constraints import Report, evaluate
