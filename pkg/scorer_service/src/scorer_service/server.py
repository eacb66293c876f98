"""Command-line launcher: ``scorer-service --backend toy --port 8400``."""

from __future__ import annotations

import argparse

import uvicorn

from .app import create_app, make_backend


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="scorer-service", description=__doc__)
    parser.add_argument("--backend", choices=("toy", "model"), default="toy")
    parser.add_argument("--model-path", help="checkpoint for the model backend")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8400)
    args = parser.parse_args(argv)

    app = create_app(make_backend(args.backend, args.model_path))
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
