"""One module per pipeline step; each exposes ``register(subparsers)``"""
