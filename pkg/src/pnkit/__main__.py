from pnkit.cli import main

main()
