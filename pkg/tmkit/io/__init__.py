from .dot import ExportView, DotGraph, to_dot
from .codec import FORMAT_TAG, DecodeError, to_json, from_json
