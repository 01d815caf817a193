from .formatting import csv_table, dumps_json, format_decimal, format_rational, parse_rational

__all__ = ["csv_table", "dumps_json", "format_decimal", "format_rational", "parse_rational"]
