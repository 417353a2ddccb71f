"""Command-line entry points: run the server, seed fixtures, export reports."""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .api import create_app
from .config import load_config
from .service import TutoringService, provider_from_config
from .store import Store


def _service(args) -> TutoringService:
    config = load_config()
    if args.store:
        config.store_path = args.store
    if getattr(args, "mock_provider", False):
        config.provider.use_mock = True
    store = Store(config.store_path)
    return TutoringService(store, provider_from_config(config), config)


def cmd_serve(args) -> int:
    import uvicorn

    config = load_config()
    if args.store:
        config.store_path = args.store
    if args.mock_provider:
        config.provider.use_mock = True
    store = Store(config.store_path)
    service = TutoringService(store, provider_from_config(config), config)
    if config.instructor_token is None:
        session = service.register_instructor_session()
        print(f"instructor token: {session.token}", file=sys.stderr)
    app = create_app(service)
    uvicorn.run(app, host=args.host or config.bind_host, port=args.port or config.bind_port)
    return 0


def cmd_seed(args) -> int:
    service = _service(args)
    if args.course_file:
        data = json.loads(Path(args.course_file).read_text("utf-8"))
    else:
        raw = resources.files("tutorkit.fixtures").joinpath("sample_course.json").read_text("utf-8")
        data = json.loads(raw)
    course = service.content.import_course(data)
    print(f"imported course {course.id}: {course.title}")
    instructor = service.register_instructor_session(args.instructor_token)
    print(f"instructor token: {instructor.token}")
    for i in range(args.students):
        student = service.register_student(display_name=f"demo student {i + 1}")
        print(f"student token: {student.token} (reports as {student.student_token})")
    return 0


def cmd_export_report(args) -> int:
    service = _service(args)
    data = service.engagement_csv(args.course_id)
    if args.out:
        Path(args.out).write_bytes(data)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(data.decode("utf-8"))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="tutorkit")
    parser.add_argument("--store", help="path to the store file (overrides TUTORKIT_STORE_PATH)")
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default=None)
    serve.add_argument("--port", type=int, default=None)
    serve.add_argument("--mock-provider", action="store_true", help="use the offline mock provider")
    serve.set_defaults(func=cmd_serve)

    seed = sub.add_parser("seed", help="import a course file and mint demo sessions")
    seed.add_argument("--course-file", help="course JSON file (defaults to the bundled sample)")
    seed.add_argument("--students", type=int, default=2)
    seed.add_argument("--instructor-token", default=None)
    seed.add_argument("--mock-provider", action="store_true")
    seed.set_defaults(func=cmd_seed)

    export = sub.add_parser("export-report", help="write the engagement CSV for a course")
    export.add_argument("course_id")
    export.add_argument("--out", help="output path (defaults to stdout)")
    export.set_defaults(func=cmd_export_report)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
