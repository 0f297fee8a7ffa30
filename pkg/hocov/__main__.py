from hocov.cli.main import main

raise SystemExit(main())
