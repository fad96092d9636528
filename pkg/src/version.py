__version__ = "1.0.0"
__csv_schema__ = "turbox-sweep v1"
