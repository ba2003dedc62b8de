"""Printing functions for reports, the configuration and the command list."""

from typing import Iterable

import yaml
from rich import box
from rich.syntax import Syntax
from rich.table import Table

from seriesflow.core import registry
from seriesflow.core.console import console
from seriesflow.core.residual import ResidualReport


def prettyprint_yaml(in_dict):
    """Pretty-print YAML."""

    class MyDumper(yaml.SafeDumper):
        """Customized YAML dumper that indents lists."""

        def increase_indent(self, flow=False, indentless=False):
            """Force indentation."""
            return super(MyDumper, self).increase_indent(flow)

        def ignore_aliases(self, data):
            return True

    yaml_str = yaml.dump(in_dict, default_flow_style=False, Dumper=MyDumper, indent=4, allow_unicode=True)
    # Print syntax highlighted
    console.print(Syntax(yaml_str, "yaml"))


def print_reports(title: str, reports: Iterable[ResidualReport]):
    """Print one row per residual with its verdict."""
    table = Table(title=title, box=box.SIMPLE, title_justify="left")
    table.add_column("Equation", no_wrap=True)
    table.add_column("Verdict")
    table.add_column("Trustworthy order")
    table.add_column("max |r|", justify="right")
    table.add_column("First nonzero")
    for report in reports:
        if not report.conclusive:
            verdict = "[yellow]inconclusive[/yellow]"
        elif report.exact_zero:
            verdict = "[green]zero[/green]"
        else:
            verdict = "[red]nonzero[/red]"
        first = report.first_nonzero if report.conclusive and not report.exact_zero else None
        table.add_row(report.label or "residual", verdict, str(report.trustworthy_order),
                      f"{float(report.max_abs):.3g}", str(first) if first is not None else "")
    console.print(table)


def print_commands():
    """Print a summary of all commands, grouped by module."""
    table = Table(title="Available commands", box=box.SIMPLE, show_header=False, title_justify="left")
    table.add_column(no_wrap=True)
    table.add_column()

    for module_name in sorted(registry.modules):
        module = registry.modules[module_name]
        if not module.functions:
            continue
        table.add_row(f"[b]{module_name.upper()}[/b]", (module.description or "").strip().split("\n")[0])
        for cmd in sorted(module.functions.values(), key=lambda c: c.name):
            table.add_row("  " + cmd.name, cmd.description)
        table.add_row()
    console.print(table)
    console.print("For details about a specific command run [green]'seriesflow <command> -h'[/green].",
                  highlight=False)
