from .command_handler import CommandHandler, RunConfig
from .report_writer import ReportWriter
