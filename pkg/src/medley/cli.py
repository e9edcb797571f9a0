"""Command line interface.

    medley query  --config medley.cfg --query 'Ans(X) :- ...;'
    medley plan   --config medley.cfg --file q.cq
    medley sources --config medley.cfg
    medley serve  --config medley.cfg --port 8080
    medley serve-source --config medley.cfg --source sgd --port 9001

Exit codes: 0 success, 1 internal error, 2 usage or configuration,
3 query parse, 4 validation, 5 planning, 6 execution or transport.
"""

from __future__ import annotations

import argparse
import sys

from . import formats
from .errors import ConfigError, MedleyError
from .mediator import Mediator, MediatorConfig
from .xsource.server import make_source_server
from .xsource.service import InProcService

_EXIT_BY_STAGE = {
    "parse": 3,
    "validate": 4,
    "plan": 5,
    "execute": 6,
    "transport": 6,
    "config": 2,
    "ontology": 2,
    "directory": 2,
}


def _exit_code(exc):
    return _EXIT_BY_STAGE.get(exc.stage, 1)


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="medley",
        description="federated conjunctive-query mediator over XML data services",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config(p):
        p.add_argument(
            "--config",
            default="medley.cfg",
            help="mediator config file (default: ./medley.cfg)",
        )

    def add_query_inputs(p):
        p.add_argument("--query", help="query text")
        p.add_argument("--file", help="read query text from a file")
        p.add_argument(
            "--sources",
            help="comma separated source names to restrict the directory to",
        )

    q = sub.add_parser("query", help="answer a query")
    add_config(q)
    add_query_inputs(q)
    q.add_argument("--keyword", help="keyword search instead of a query")
    q.add_argument(
        "--format", choices=formats.FORMATS, help="output format (default from config)"
    )
    q.add_argument(
        "--explain",
        action="store_true",
        help="include the plan and call ledger in the output",
    )

    p = sub.add_parser("plan", help="show the plan without executing it")
    add_config(p)
    add_query_inputs(p)

    s = sub.add_parser("sources", help="list registered sources")
    add_config(s)

    srv = sub.add_parser("serve", help="run the HTTP API")
    add_config(srv)
    srv.add_argument("--port", type=int, help="override the configured port")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--ui", help="directory with the built query UI")

    ss = sub.add_parser("serve-source", help="expose one source over HTTP")
    add_config(ss)
    ss.add_argument("--source", required=True, help="source name from the registry")
    ss.add_argument("--port", type=int, default=0)
    ss.add_argument("--host", default="127.0.0.1")

    return parser


def _read_query(args):
    given = [x for x in (args.query, args.file) if x]
    if len(given) > 1:
        raise ConfigError("use either --query or --file, not both")
    if args.query:
        return args.query
    if args.file:
        try:
            with open(args.file, encoding="utf-8") as fh:
                return fh.read()
        except OSError as exc:
            raise ConfigError("cannot read query file: %s" % exc)
    if sys.stdin.isatty():
        raise ConfigError("no query given; use --query, --file or pipe to stdin")
    return sys.stdin.read()


def _split_sources(value):
    if not value:
        return None
    names = [s.strip() for s in value.split(",") if s.strip()]
    if not names:
        raise ConfigError("--sources lists no source names")
    return names


def _load(args):
    config = MediatorConfig.load(args.config)
    return config, Mediator.from_config(config)


def _cmd_query(args):
    config, mediator = _load(args)
    fmt = args.format or config.format
    sources = _split_sources(args.sources)
    if args.keyword and (args.query or args.file):
        raise ConfigError("--keyword cannot be combined with --query/--file")
    if args.keyword:
        result = mediator.answer_keyword(
            args.keyword, sources=sources, explain=args.explain
        )
    else:
        result = mediator.answer(
            _read_query(args), sources=sources, explain=args.explain
        )
    sys.stdout.write(formats.render(result, fmt))
    if args.explain and fmt in ("rdf", "xml") and result.diagnostics:
        # these formats cannot embed diagnostics; keep stdout clean
        sys.stderr.write(result.diagnostics.get("plan", "") + "\n")
        for call in result.diagnostics.get("calls", []):
            sys.stderr.write(
                "call %(group)s %(source)s: %(query)s -> %(items)d item(s)\n" % call
            )
    return 0


def _cmd_plan(args):
    _, mediator = _load(args)
    text = mediator.explain_text(_read_query(args), sources=_split_sources(args.sources))
    sys.stdout.write(text + "\n")
    return 0


def _cmd_sources(args):
    _, mediator = _load(args)
    for info in mediator.sources_info():
        sys.stdout.write(
            "%s\t%s\tschema=%s\n" % (info["name"], info["endpoint"], info["schema"])
        )
        if info["description"]:
            sys.stdout.write("\t%s\n" % info["description"])
        sys.stdout.write(
            "\tclasses: %s\n\tproperties: %s\n"
            % (", ".join(info["classes"]), ", ".join(info["properties"]))
        )
    return 0


def _cmd_serve(args):
    from .httpapi import make_api_server

    config, mediator = _load(args)
    port = args.port if args.port is not None else config.port
    ui_dir = args.ui or config.ui_dir
    server = make_api_server(
        mediator, host=args.host, port=port, ui_dir=ui_dir,
        default_format=config.format,
    )
    host, actual_port = server.server_address[:2]
    sys.stdout.write("serving on http://%s:%d\n" % (host, actual_port))
    sys.stdout.flush()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _cmd_serve_source(args):
    config = MediatorConfig.load(args.config)
    mediator = Mediator.from_config(config)
    if args.source not in mediator.directory.sources:
        raise ConfigError("unknown source %r" % args.source)
    service = mediator.services[args.source]
    if not isinstance(service, InProcService):
        raise ConfigError(
            "source %r is remote already (%s)" % (args.source, service.endpoint)
        )
    server = make_source_server(service, host=args.host, port=args.port)
    host, actual_port = server.server_address[:2]
    sys.stdout.write("serving source %s on http://%s:%d\n" % (args.source, host, actual_port))
    sys.stdout.flush()
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


_COMMANDS = {
    "query": _cmd_query,
    "plan": _cmd_plan,
    "sources": _cmd_sources,
    "serve": _cmd_serve,
    "serve-source": _cmd_serve_source,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except MedleyError as exc:
        sys.stderr.write("error (%s): %s\n" % (exc.stage, exc))
        return _exit_code(exc)
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
