fetch("https://api.weather.example/v1/forecast?city=" + city);
