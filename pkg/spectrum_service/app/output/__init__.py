from .writer import ResultWriter, format_value
