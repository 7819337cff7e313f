from .poscone_cli import main

main()
