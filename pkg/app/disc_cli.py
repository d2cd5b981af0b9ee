from disc.cli_io.commands import main

if __name__ == "__main__":
    main()
