from elfkit.cli import main

main()
