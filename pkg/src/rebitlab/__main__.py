from rebitlab.cli import main

raise SystemExit(main())
